//@ direction: eq
// identical fragments
void C1() {
    foo();
    bar();
}

void C2() {
    foo();
    bar();
}
