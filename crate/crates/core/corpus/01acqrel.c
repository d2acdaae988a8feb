// acquire and release around a countdown
void C1(int n) {
    while (n > 0) {
        acquire();
        n--;
        release();
    }
}

void C2(int n) {
    acquire();
    while (n > 0) {
        n--;
    }
    release();
}
