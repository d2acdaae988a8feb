//@ direction: eq
// the same branch over differently named inputs
void C1(int a) {
    if (a > 0) foo();
    else bar();
}

void C2(int b) {
    if (b > 0) foo();
    else bar();
}
