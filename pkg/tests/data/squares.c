struct S {
   unsigned int p;
   unsigned int q;
} a[100000];
int i,k;

main()
{
  for(i=0; i<100000; i++)
  {
    k = i;
    a[i].p = k;
    a[i].q = k * k ;
  }

  for (i=0; i<100000; i++)
  {
    assert(a[i].q == a[i].p * a[i].p);
  }
}
