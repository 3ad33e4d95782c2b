package corpus;

public class AuditRequestLog {
    private final String path;

    public AuditRequestLog(String path) {
        this.path = path;
    }

    public String getPath() {
        return path;
    }
}
