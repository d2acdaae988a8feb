// one arm of the branch has no counterpart
void C1(int x) {
    if (x > 0) evA();
    else evB();
}

void C2() {
    evA();
}
