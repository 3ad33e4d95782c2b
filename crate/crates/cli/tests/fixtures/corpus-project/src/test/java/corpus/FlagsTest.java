package corpus;

import static org.junit.jupiter.api.Assertions.assertEquals;
import static org.junit.jupiter.api.Assertions.assertFalse;
import static org.junit.jupiter.api.Assertions.assertTrue;

import org.junit.jupiter.api.Test;

class FlagsTest {
    private final Flags on = new Flags(true, false);
    private final Flags shown = new Flags(false, true);

    @Test
    void basicFlags() {
        assertFalse(on.isDisabled());
        assertTrue(shown.isDisabled());
        assertTrue(shown.isShown());
        assertFalse(on.isShown());
        assertTrue(on.isEnabled());
        assertFalse(shown.isEnabled());
    }

    @Test
    void combinations() {
        assertTrue(on.either(false));
        assertTrue(shown.either(true));
        assertFalse(shown.either(false));
        assertTrue(on.allowed(true));
        assertFalse(on.allowed(false));
        assertFalse(shown.allowed(true));
    }

    @Test
    void statusText() {
        assertEquals("on", on.status());
        assertEquals("off", shown.status());
        assertEquals("off, visible", shown.describe());
        assertEquals("on", on.describe());
    }

    @Test
    void toggling() {
        assertFalse(on.toggled());
        assertTrue(shown.toggled());
    }

    @Test
    void weights() {
        assertEquals(2, on.weight());
        assertEquals(1, shown.weight());
        assertEquals(3, new Flags(true, true).weight());
    }
}
