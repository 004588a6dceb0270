int a[2]; a[0] = 7; a[1] = 9; assert(1);
