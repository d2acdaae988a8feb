//@ direction: eq
//@ protect: evA, evB
// two different events that may not be hidden
void C1() {
    evA();
}

void C2() {
    evB();
}
