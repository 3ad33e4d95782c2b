package corpus;

import java.util.Collection;
import java.util.HashSet;
import java.util.List;
import java.util.Map;
import java.util.Set;

public class Samples {
    private final AuditRepository repository;

    public Samples(AuditRepository repository) {
        this.repository = repository;
    }

    public boolean isValid(CacheObject co) {
        if (false == co.isExpired()) {
            return true;}
        return false;
    }

    public Set<String> keys() {
        Set<String> conditionKeys = new HashSet<String>();
        return conditionKeys;
    }

    private String createToken() {
        CsrfToken csrfToken = new CsrfToken();
        String token = csrfToken.create();
        return token;
    }

    public String token() {
        return createToken();
    }

    public Collection<AuditRequestLog> getAuditRequestLogs() {
        Collection<AuditRequestLog> newList = repository.findAll();
        return newList;
    }

    public int findProduct(List<Integer> numbers, Map<Integer, Integer> map) {
        for(int i = 0; i < numbers.size(); i++) {
            Integer currentNum = numbers.get(i);
            Integer otherNum = map.get(2020 - currentNum);
            if (otherNum != null) {
                System.out.println("this num = " + currentNum);
                System.out.println("other num = " + otherNum);
                int result = otherNum * currentNum;
                System.out.println("result = " + result);
                return result;
            }
        }
        return -1;
    }
}
