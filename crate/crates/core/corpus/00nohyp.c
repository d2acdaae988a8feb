// a nondeterministic choice against an input-driven branch
void C1(int a) {
    if (a > 0) evA();
    else evB();
}

void C2() {
    t = nondet();
    if (t > 0) evB();
    else evA();
}
