// countdowns with different strides between the same events
void C1(int x) {
    eventA();
    while (x > 0) x = x - 1;
    eventB();
    eventA();
}

void C2(int x) {
    eventA();
    while (x > 0) x = x - 2;
    eventB();
    eventA();
}
