package corpus;

import java.util.List;

public final class Text {
    private Text() {
    }

    public static String greet(String name) {
        String message = "Hello, " + name + "!";
        return message;
    }

    public static boolean isBlank(String s) {
        if (s == null) {
            return true;
        }
        if (s.trim().isEmpty() == true) {
            return true;
        }
        return false;
    }

    public static String initials(String first, String last) {
        StringBuilder sb = new StringBuilder();
        sb.append(first.charAt(0));
        sb.append(last.charAt(0));
        String result = sb.toString();
        return result;
    }

    public static int countVowels(String s) {
        int count = 0;
        int unused = 0;
        for (int i = 0; i < s.length(); i++) {
            char c = Character.toLowerCase(s.charAt(i));
            if ("aeiou".indexOf(c) >= 0) {
                count++;
            }
        }
        return count;
    }

    public static String repeat(String s, int n) {
        String out = "";
        for (int i = 0; i < n; i++) {
            out = out + s;
        }
        return out;
    }

    public static boolean startsWithUpper(String s) {
        boolean upper = !s.isEmpty() && Character.isUpperCase(s.charAt(0));
        return upper == true;
    }

    public static String reverse(String s) {
        String r = new StringBuilder(s).reverse().toString();
        return r;
    }

    public static String joinWords(List<String> words) {
        StringBuilder sb = new StringBuilder();
        for (int i = 0; i < words.size(); i++) {
            if (i > 0) {
                sb.append(" ");
            }
            sb.append(words.get(i));
        }
        return sb.toString();
    }

    public static String shout(String s) {
        String upper = s.toUpperCase();
        String trimmed = upper.trim();
        return trimmed + "!";
    }

    public static int wordCount(String s) {
        if (s.trim().isEmpty()) {
            return 0;
        }
        String[] parts = s.trim().split("\\s+");
        int n = parts.length;
        return n;
    }

    public static String padLeft(String s, int width) {
        StringBuilder sb = new StringBuilder();
        int missing = width - s.length();
        for (int i = 0; i < missing; i++) {
            sb.append(' ');
        }
        sb.append(s);
        String debug = s;
        return sb.toString();
    }
}
