struct S { int p; int q; } a[3]; int i; int k;
for (i = 0; i < 3; i++) { k = i; a[i].p = k; a[i].q = k * k; }
for (i = 0; i < 3; i++) { assert(a[i].q == a[i].p * a[i].p); }
