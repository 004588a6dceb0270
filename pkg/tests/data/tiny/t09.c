int a[3]; int b[2]; a[2] = 5; b[0] = a[2]; assert(b[0] == 5);
