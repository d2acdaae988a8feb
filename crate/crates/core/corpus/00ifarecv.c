// a conditional send against an unconditional one
void C1() {
    init();
    a = recv();
    if (a > 0) send();
}

void C2() {
    init();
    a = recv();
    send();
}
