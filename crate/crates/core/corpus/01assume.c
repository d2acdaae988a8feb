// an extra guard on a counting loop
void C1() {
    count = nondet();
    while (count <= 4) {
        printf(count);
        count++;
    }
}

void C2(int number) {
    count = nondet();
    while (count <= 4 && number >= 0) {
        printf(count);
        count++;
    }
}
