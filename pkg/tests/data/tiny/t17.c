struct P { int v; } a[2]; a[0].v = 3; a[1].v = a[0].v + 1; assert(a[1].v == 4);
