unsigned int a[2]; unsigned int u; u = 0 - 1; a[1] = u; assert(a[1] == u);
