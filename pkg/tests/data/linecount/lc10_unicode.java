package ü;

/* ünïcödé comment */
public class Ünïcode {
    String grüße = "héllo";  // ✓
    int 变量;

    /** «doc» */
}
