// an empty fragment against a single event
void C1() {
    skip;
}

void C2() {
    eventA();
}
