int a[3]; int i; for (i = 0; i < 3; i++) { a[i] = i; } assert(1);
