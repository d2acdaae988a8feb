// one event doubled in different positions
void C1() {
    eventA();
    eventB();
    eventB();
}

void C2() {
    eventA();
    eventA();
    eventB();
}
