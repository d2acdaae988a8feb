//@ direction: eq
// a flag toggled through inverted branches
void C1(int k) {
    i = 0;
    while (i < k) {
        n = nondet();
        if (n > 0) t = 1;
        else t = 0;
        i++;
    }
}

void C2(int k) {
    i = 0;
    while (i < k) {
        n = nondet();
        if (n <= 0) t = 0;
        else t = 1;
        i++;
    }
}
