// the receive moves out of the branch
void C1() {
    a = nondet();
    if (a > 0) {
        send();
        recv();
    }
}

void C2() {
    a = nondet();
    if (a > 0) send();
    recv();
}
