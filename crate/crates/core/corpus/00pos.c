// a case split alone relates the positive arm
void C1(int x) {
    if (x > 0) evA();
    else evB();
}

void C2(int x) {
    evA();
}
