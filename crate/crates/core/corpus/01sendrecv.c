// a reactive loop that logs every receive against one that checks authorization
void C1(int x) {
    while (x > 0) {
        b = recv();
        if (b > 0) {
            auth = check(b);
            if (auth > 0) {
                n = constructReply();
                send(n);
            }
        } else log(b);
        x--;
    }
}

void C2(int x) {
    while (x > 0) {
        b = recv();
        log(b);
        if (b > 0) {
            n = constructReply();
            send(n);
        }
        x--;
    }
}
