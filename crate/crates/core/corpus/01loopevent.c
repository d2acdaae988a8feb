// an extra event on some iterations
void C1(int i, int j) {
    while (i < 10 || j < 10) {
        eventA();
        i++;
        j++;
    }
}

void C2(int i, int j) {
    while (i < 10 || j < 10) {
        eventA();
        i++;
        j++;
        if (i > 5) eventA();
    }
}
