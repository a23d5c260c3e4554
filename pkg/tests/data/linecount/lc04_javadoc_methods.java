package a;

/**
 * Javadoc before class.
 */
public class WithMethods {
    /** the id */
    @Id
    Long id;

    public Long getId() {
        // inside method
        return id;
    }

    /*
     * multi
     */
    public void setId(Long id) { this.id = id; }
}
