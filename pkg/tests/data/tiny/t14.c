int a[2]; int i; int s; for (i = 0; i < 2; i++) { s = s + a[i]; } assert(s == 0);
