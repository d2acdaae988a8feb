//@ left: C2
// every arm of the right fragment maps onto one event
void C1(int n) {
    evA();
}

void C2(int n) {
    if (n > 0) evB();
    else evC();
}
