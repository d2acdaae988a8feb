// branches on fresh nondeterministic values
void C1() {
    i = nondet();
    if (i > 0) evB();
    else evC();
    evD();
}

void C2() {
    i = nondet();
    if (i > 0) evB();
    else evB();
    evD();
}
