//@ direction: eq
// the branch condition is inverted along with its arms
void C1(int a) {
    if (a > 0) foo();
    else bar();
}

void C2(int b) {
    if (b > 0) bar();
    else foo();
}
