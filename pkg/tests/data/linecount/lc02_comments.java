package a;
// leading comment
public class Commented {
    // a counter
    int count;

    /* block on one line */
    String name;

    // last comment
    long id;
}
