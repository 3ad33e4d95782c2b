package corpus;

import java.util.ArrayList;
import java.util.HashMap;
import java.util.HashSet;
import java.util.List;
import java.util.Map;
import java.util.Set;

public final class Lists {
    private Lists() {
    }

    public static int sum(List<Integer> xs) {
        int total = 0;
        for (int i = 0; i < xs.size(); i++) {
            total += xs.get(i);
        }
        return total;
    }

    public static List<String> nonEmpty(List<String> xs) {
        List<String> out = new ArrayList<String>();
        for (String x : xs) {
            if (!x.isEmpty()) {
                out.add(x);
            }
        }
        return out;
    }

    public static Map<String, Integer> lengths(List<String> words) {
        Map<String, Integer> result = new HashMap<String, Integer>();
        for (String w : words) {
            result.put(w, w.length());
        }
        return result;
    }

    public static boolean containsNegative(List<Integer> xs) {
        boolean found = false;
        for (Integer x : xs) {
            if (x < 0) {
                found = true;
            }
        }
        return found;
    }

    public static Integer first(List<Integer> xs) {
        if (xs.isEmpty()) {
            return null;
        }
        Integer head = xs.get(0);
        return head;
    }

    public static int countMatches(List<String> xs, String target) {
        int n = 0;
        for (String x : xs) {
            if (x.equals(target) == true) {
                n++;
            }
        }
        return n;
    }

    public static List<Integer> doubled(List<Integer> xs) {
        List<Integer> out = new ArrayList<>();
        for (Integer x : xs) {
            out.add(x * 2);
        }
        xs.size();
        return out;
    }

    public static String last(List<String> xs) {
        String result = null;
        if (!xs.isEmpty()) {
            result = xs.get(xs.size() - 1);
        }
        return result;
    }

    public static Set<String> unique(List<String> xs) {
        Set<String> seen = new HashSet<String>();
        seen.addAll(xs);
        return seen;
    }

    public static int longest(List<String> xs) {
        int best = 0;
        for (int i = 0; i < xs.size(); i++) {
            String s = xs.get(i);
            if (s.length() > best) {
                best = s.length();
            }
        }
        return best;
    }

    public static List<Integer> range(int from, int to) {
        List<Integer> out = new ArrayList<>();
        int i = from;
        while (i < to) {
            out.add(i);
            i++;
        }
        return out;
    }
}
