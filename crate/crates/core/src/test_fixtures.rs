//! Method texts shared by unit tests.

pub const IS_VALID: &str = "public boolean isValid(CacheObject co) {
    if (false == co.isExpired()) {
        return true;}
    return false;
}
";
pub const IS_VALID_SIMPLE: &str = "public boolean isValid(CacheObject co) {
    if (!co.isExpired()) {
        return true;}
    return false;
}
";

pub const KEYS: &str = "public Set<String> keys() {
    Set<String> conditionKeys = new HashSet<String>();
    return conditionKeys;
}
";
pub const KEYS_SIMPLE: &str = "public Set<String> keys() {
    Set<String> conditionKeys = new HashSet<>();
    return conditionKeys;
}
";

pub const CREATE: &str = "public String create() {
    String token = UUID.randomUUID().toString();
    return token;
}
";
pub const CREATE_SIMPLE: &str = "public String create() {
    return UUID.randomUUID().toString();
}
";
pub const CREATE_TOKEN: &str = "private String createToken() {
    CsrfToken csrfToken = new CsrfToken();
    String token = csrfToken.create();
    return token;
}
";
pub const CREATE_TOKEN_SIMPLE: &str = "private String createToken() {
    CsrfToken csrfToken = new CsrfToken();
    return csrfToken.create();
}
";

pub const AUDIT_LOGS: &str = "public Collection<AuditRequestLog> getAuditRequestLogs() {
    Collection<AuditRequestLog> newList = repository.findAll();
    return newList;
}
";
pub const AUDIT_LOGS_SIMPLE: &str = "public Collection<AuditRequestLog> getAuditRequestLogs() {
    return repository.findAll();
}
";

pub const FIND_PRODUCT: &str = "public int findProduct(List<Integer> numbers, Map<Integer, Integer> map) {
    for(int i = 0; i < numbers.size(); i++) {
        Integer currentNum = numbers.get(i);
        Integer otherNum = map.get(2020 - currentNum);
        if (otherNum != null) {
            System.out.println(\"this num = \" + currentNum);
            System.out.println(\"other num = \" + otherNum);
            int result = otherNum * currentNum;
            System.out.println(\"result = \" + result);
            return result;
        }
    }
    return -1;
}
";
pub const FIND_PRODUCT_SIMPLE: &str = "public int findProduct(List<Integer> numbers, Map<Integer, Integer> map) {
    for(Integer currentNum : numbers) {
        Integer otherNum = map.get(2020 - currentNum);
        if (otherNum != null) {
            System.out.println(\"this num = \" + currentNum);
            System.out.println(\"other num = \" + otherNum);
            int result = otherNum * currentNum;
            System.out.println(\"result = \" + result);
            return result;
        }
    }
    return -1;
}
";
