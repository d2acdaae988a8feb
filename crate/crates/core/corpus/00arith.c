// a loop whose first iteration is peeled in the second fragment
void C1(int x, int y) {
    while (x > 0) {
        if (y > 0) foo();
        else bar();
        x--;
    }
}

void C2(int x, int y) {
    foo();
    while (x > 0) {
        if (y <= 0) bar();
        else foo();
        x--;
    }
}
