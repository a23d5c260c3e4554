package a;

@Entity(
    name = "things"   // inline comment
)
@Cache
public abstract class Thing
    extends Base {

    @Index
    @AlsoLoad({"a",
               "b"})
    String label;
}
