//@ direction: eq
// the same two events in swapped order
void C1() {
    foo();
    bar();
}

void C2() {
    bar();
    foo();
}
