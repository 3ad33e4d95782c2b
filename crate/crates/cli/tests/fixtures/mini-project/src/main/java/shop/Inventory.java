package shop;

import java.util.ArrayList;
import java.util.HashMap;
import java.util.List;
import java.util.Map;

public class Inventory {
    private final Map<String, Integer> stock = new HashMap<String, Integer>();

    public void add(String item, int count) {
        if (count <= 0) {
            throw new IllegalArgumentException("count must be positive: " + count);
        }
        stock.put(item, count(item) + count);
    }

    public int count(String item) {
        Integer n = stock.get(item);
        if (n == null) {
            return 0;
        }
        return n;
    }

    public boolean isEmpty() {
        if (stock.isEmpty() == true) {
            return true;
        }
        return false;
    }

    public String describe(String item) {
        String label = item + " x" + count(item);
        return label;
    }

    public List<String> lowStock(int threshold) {
        List<String> result = new ArrayList<String>();
        for (String item : stock.keySet()) {
            if (stock.get(item) < threshold) {
                result.add(item);
            }
        }
        return result;
    }
}
