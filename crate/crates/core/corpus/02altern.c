//@ direction: eq
// alternating events in opposite order
void C1(int x) {
    while (x > 0) {
        x--;
        eventA();
        eventB();
    }
}

void C2(int x) {
    while (x > 0) {
        x--;
        eventB();
        eventA();
    }
}
