// Display formatting for the service's fixed 4-decimal number strings.
//
// The rule mirrors the server's presentation rounding: two decimals, half-up
// away from zero. Everything works on digit strings so the dashboard does no
// floating-point arithmetic of its own.

function incrementDigits(digits: string): string {
  const out = digits.split('');
  for (let i = out.length - 1; i >= 0; i--) {
    if (out[i] === '9') {
      out[i] = '0';
    } else {
      out[i] = String.fromCharCode(out[i].charCodeAt(0) + 1);
      return out.join('');
    }
  }
  return '1' + out.join('');
}

function stripLeadingZeros(digits: string): string {
  const trimmed = digits.replace(/^0+/, '');
  return trimmed === '' ? '0' : trimmed;
}

/** "40.0000" -> "40.00", "1.1050" -> "1.11", "0.4159" -> "0.42" */
export function twoDecimals(value: string): string {
  const negative = value.startsWith('-');
  const body = negative ? value.slice(1) : value;
  const dot = body.indexOf('.');
  const intPart = dot < 0 ? body : body.slice(0, dot);
  const frac = ((dot < 0 ? '' : body.slice(dot + 1)) + '0000').slice(0, 4);
  let hundredths = intPart + frac.slice(0, 2);
  if (frac.charCodeAt(2) - 48 >= 5) {
    hundredths = incrementDigits(hundredths);
  }
  const padded = hundredths.padStart(3, '0');
  const result =
    stripLeadingZeros(padded.slice(0, -2)) + '.' + padded.slice(-2);
  return negative && result !== '0.00' ? '-' + result : result;
}

/**
 * Renders a fraction string as a percentage by shifting the decimal point
 * two places, then applying the two-decimal rule and dropping a trailing
 * ".00": "0.4100" -> "41%", "1.1000" -> "110%", "0.4025" -> "40.25%".
 */
export function percent(fraction: string): string {
  const negative = fraction.startsWith('-');
  const body = negative ? fraction.slice(1) : fraction;
  const dot = body.indexOf('.');
  const intPart = dot < 0 ? body : body.slice(0, dot);
  const frac = ((dot < 0 ? '' : body.slice(dot + 1)) + '0000').slice(0, 4);
  const shifted =
    stripLeadingZeros(intPart + frac.slice(0, 2)) + '.' + frac.slice(2);
  const rounded = twoDecimals((negative ? '-' : '') + shifted);
  return rounded.replace(/\.00$/, '').replace(/(\.\d)0$/, '$1') + '%';
}
