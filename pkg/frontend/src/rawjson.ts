// Extract the exact source text of a number inside a JSON document.
//
// JSON.parse collapses 2.0 to the JS number 2, and rendering that gives "2"
// while the server said "2.0". Panels that promise to echo server numbers
// byte-for-byte pull the token straight out of the response text instead.

export type JsonPath = (string | number)[];

const WS = new Set([' ', '\t', '\n', '\r']);
const NUMBER = /-?(?:0|[1-9]\d*)(?:\.\d+)?(?:[eE][+-]?\d+)?/y;

class Scanner {
  pos = 0;

  constructor(readonly text: string) {}

  ws(): void {
    while (this.pos < this.text.length && WS.has(this.text[this.pos])) this.pos++;
  }

  peek(): string {
    if (this.pos >= this.text.length) throw new Error('unexpected end of JSON text');
    return this.text[this.pos];
  }

  expect(ch: string): void {
    if (this.peek() !== ch) {
      throw new Error(`expected '${ch}' at offset ${this.pos}, found '${this.peek()}'`);
    }
    this.pos++;
  }

  // returns the decoded key so object navigation can match path segments
  string(): string {
    const start = this.pos;
    this.expect('"');
    while (this.peek() !== '"') {
      if (this.peek() === '\\') this.pos++;
      this.pos++;
    }
    this.pos++;
    return JSON.parse(this.text.slice(start, this.pos)) as string;
  }

  number(): string {
    NUMBER.lastIndex = this.pos;
    const match = NUMBER.exec(this.text);
    if (!match || match.index !== this.pos) {
      throw new Error(`expected a number at offset ${this.pos}`);
    }
    this.pos += match[0].length;
    return match[0];
  }

  literal(word: string): void {
    if (!this.text.startsWith(word, this.pos)) {
      throw new Error(`malformed JSON at offset ${this.pos}`);
    }
    this.pos += word.length;
  }

  skipValue(): void {
    this.ws();
    const ch = this.peek();
    if (ch === '{') {
      this.pos++;
      this.ws();
      if (this.peek() === '}') return void this.pos++;
      for (;;) {
        this.ws();
        this.string();
        this.ws();
        this.expect(':');
        this.skipValue();
        this.ws();
        if (this.peek() === ',') { this.pos++; continue; }
        this.expect('}');
        return;
      }
    }
    if (ch === '[') {
      this.pos++;
      this.ws();
      if (this.peek() === ']') return void this.pos++;
      for (;;) {
        this.skipValue();
        this.ws();
        if (this.peek() === ',') { this.pos++; continue; }
        this.expect(']');
        return;
      }
    }
    if (ch === '"') return void this.string();
    if (ch === 't') return this.literal('true');
    if (ch === 'f') return this.literal('false');
    if (ch === 'n') return this.literal('null');
    this.number();
  }

  // positions the scanner at the value reached by descending one segment
  descend(segment: string | number): void {
    this.ws();
    if (typeof segment === 'number') {
      this.expect('[');
      for (let i = 0; i < segment; i++) {
        this.skipValue();
        this.ws();
        this.expect(',');
      }
      return;
    }
    this.expect('{');
    for (;;) {
      this.ws();
      if (this.peek() === '}') throw new Error(`key ${JSON.stringify(segment)} not found`);
      const key = this.string();
      this.ws();
      this.expect(':');
      if (key === segment) return;
      this.skipValue();
      this.ws();
      if (this.peek() === ',') this.pos++;
    }
  }
}

export function numberTokenAt(raw: string, path: JsonPath): string {
  const scanner = new Scanner(raw);
  for (const segment of path) scanner.descend(segment);
  scanner.ws();
  return scanner.number();
}
