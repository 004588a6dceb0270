int x; int y; x = 1; if (x == 1) { y = 2; } assert(y == 2);
