package a;

public class Simple {
    int x;
}
