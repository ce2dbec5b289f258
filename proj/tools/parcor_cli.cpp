#include <cstdio>
int main(){ std::puts("parcor"); return 0; }
