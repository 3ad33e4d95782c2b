package corpus;

import java.util.ArrayList;
import java.util.List;

public class AuditRepository {
    private final List<AuditRequestLog> logs = new ArrayList<>();

    public void save(AuditRequestLog log) {
        logs.add(log);
    }

    public List<AuditRequestLog> findAll() {
        return new ArrayList<>(logs);
    }
}
