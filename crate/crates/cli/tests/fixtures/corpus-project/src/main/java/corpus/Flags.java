package corpus;

public class Flags {
    private final boolean enabled;
    private final boolean visible;

    public Flags(boolean enabled, boolean visible) {
        this.enabled = enabled;
        this.visible = visible;
    }

    public boolean isDisabled() {
        return enabled == false;
    }

    public boolean isShown() {
        if (visible == true) {
            return true;
        }
        return false;
    }

    public boolean isEnabled() {
        return !!enabled;
    }

    public boolean either(boolean other) {
        boolean result = enabled || other;
        return result;
    }

    public String status() {
        if (enabled) {
            return "on";
        } else {
            return "off";
        }
    }

    public boolean toggled() {
        boolean flipped = enabled ? false : true;
        return flipped;
    }

    public int weight() {
        int w = 0;
        if (enabled) {
            w = w + 2;
        }
        if (visible) {
            w = w + 1;
        }
        ;
        return w;
    }

    public boolean allowed(boolean admin) {
        if (admin) {
            if (enabled) {
                return true;
            }
        }
        return false;
    }

    public String describe() {
        String text = status();
        if (visible) {
            text = text + ", visible";
        }
        String copy = text;
        return text;
    }
}
