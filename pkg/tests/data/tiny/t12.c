int a[3]; int i; for (i = 0; i <= 2; i++) { a[i] = 1; } for (i = 0; i < 3; i++) { assert(a[i] == 1); }
