int a[2]; int x; a[1] = 4; x = a[1]; assert(x == 4);
