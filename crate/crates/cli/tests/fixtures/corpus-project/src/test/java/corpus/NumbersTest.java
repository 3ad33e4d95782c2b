package corpus;

import static org.junit.jupiter.api.Assertions.assertEquals;
import static org.junit.jupiter.api.Assertions.assertFalse;
import static org.junit.jupiter.api.Assertions.assertTrue;

import org.junit.jupiter.api.Test;

class NumbersTest {
    @Test
    void maxAndAbs() {
        assertEquals(4, Numbers.max(4, 2));
        assertEquals(4, Numbers.max(2, 4));
        assertEquals(3, Numbers.abs(-3));
        assertEquals(3, Numbers.abs(3));
    }

    @Test
    void sums() {
        assertEquals(55, Numbers.sumTo(10));
        assertEquals(0, Numbers.sumTo(0));
    }

    @Test
    void parity() {
        assertTrue(Numbers.isEven(4));
        assertFalse(Numbers.isEven(7));
    }

    @Test
    void clamping() {
        assertEquals(1, Numbers.clamp(-5, 1, 9));
        assertEquals(9, Numbers.clamp(50, 1, 9));
        assertEquals(5, Numbers.clamp(5, 1, 9));
    }

    @Test
    void averages() {
        assertEquals(0.0, Numbers.average(new int[0]));
        assertEquals(2.5, Numbers.average(new int[] {1, 2, 3, 4}));
    }

    @Test
    void signs() {
        assertEquals(1, Numbers.sign(9));
        assertEquals(-1, Numbers.sign(-9));
        assertEquals(0, Numbers.sign(0));
    }

    @Test
    void factorials() {
        assertEquals(1L, Numbers.factorial(0));
        assertEquals(3628800L, Numbers.factorial(10));
        assertEquals(2432902008176640000L, Numbers.factorial(20));
    }

    @Test
    void gcds() {
        assertEquals(6, Numbers.gcd(54, 24));
        assertEquals(7, Numbers.gcd(7, 0));
    }

    @Test
    void ranges() {
        assertTrue(Numbers.inRange(5, 1, 9));
        assertFalse(Numbers.inRange(0, 1, 9));
        assertFalse(Numbers.inRange(10, 1, 9));
    }

    @Test
    void digitCounts() {
        assertEquals(1, Numbers.digits(0));
        assertEquals(3, Numbers.digits(-123));
    }

    @Test
    void lenientParsing() {
        assertEquals(42, Numbers.parseOrZero(" 42 "));
        assertEquals(0, Numbers.parseOrZero("x"));
        assertEquals(0, Numbers.parseOrZero(null));
    }
}
