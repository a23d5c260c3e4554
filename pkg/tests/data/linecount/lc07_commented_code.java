package a;

public class Commented2 {
    // int ghost; class Fake { }
    /*
    @Entity class Hidden {
        int z;
    }
    */
    int real;
}
