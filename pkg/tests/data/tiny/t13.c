int a[1]; a[0] = 2; a[0] = a[0] + 1; assert(a[0] == 3);
