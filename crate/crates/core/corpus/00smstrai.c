// straight-line code with two optional steps
void C1(int a, int b) {
    if (b > 0) m1();
    m4();
    if (a > 0) m11();
    m14();
}

void C2() {
    m1();
    m4();
    m11();
    m14();
}
