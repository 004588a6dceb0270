int a[2]; int x; a[0] = 1; a[1] = 2; x = a[0] * a[1]; assert(x == 2);
