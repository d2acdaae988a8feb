//@ left: C2
void C1(int x, int l) {
    while (x > 0) {
        m = recv();
        if (l) log(m);
        if (m > 0) {
            n = constructReply();
            send(n);
            if (l) log(n);
        }
        x--;
    }
}

void C2(int x) {
    while (x > 0) {
        m = recv();
        if (m > 0) {
            auth = check(m);
            if (auth > 0) {
                n = constructReply();
                send(n);
            }
        } else { log(m); }
        x--;
    }
}
