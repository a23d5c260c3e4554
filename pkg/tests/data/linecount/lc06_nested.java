package a;

public class Outer {
    int a;

    static class Inner {
        // inner comment
        int b;
    }

    enum Kind { ONE, TWO }
}
