package corpus;

import java.util.ArrayList;
import java.util.List;

public class Account {
    private final String owner;
    private long balance;
    private final List<String> history = new ArrayList<String>();

    public Account(String owner) {
        this.owner = owner;
    }

    public long getBalance() {
        long current = balance;
        return current;
    }

    public void deposit(long amount) {
        if (amount <= 0) {
            throw new IllegalArgumentException("amount must be positive");
        }
        long before = balance;
        balance = balance + amount;
        history.add("deposit " + amount);
    }

    public boolean withdraw(long amount) {
        if (amount > balance) {
            return false;
        } else {
            balance -= amount;
            history.add("withdraw " + amount);
            return true;
        }
    }

    public String owner() {
        String name = owner;
        return name;
    }

    public int transactions() {
        int size = history.size();
        return size;
    }

    public String summary() {
        StringBuilder sb = new StringBuilder();
        sb.append(owner);
        sb.append(": ");
        sb.append(balance);
        String text = sb.toString();
        return text;
    }

    public boolean isOverdrawn() {
        return balance < 0 == true;
    }

    public List<String> recent(int n) {
        List<String> out = new ArrayList<String>();
        int start = Math.max(0, history.size() - n);
        for (int i = start; i < history.size(); i++) {
            out.add(history.get(i));
        }
        return out;
    }

    public void reset() {
        balance = 0;
        history.clear();
        return;
    }
}
