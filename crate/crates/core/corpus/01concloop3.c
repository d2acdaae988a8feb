// a loop that may stop early on an input
void C1(int count) {
    while (count <= 4) {
        evA();
        count++;
    }
}

void C2(int count, int number) {
    while (count <= 4 && number >= 0) {
        evA();
        count++;
    }
}
