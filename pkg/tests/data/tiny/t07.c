int a[2]; int i; int k; for (i = 0; i < 2; i++) { k = i; a[i] = k * k; assert(a[i] == k * k); }
