import { bootApp } from './main.js';

const DEFAULT_SERVICE = 'http://127.0.0.1:8000';

bootApp(document.getElementById('app') ?? document.body, DEFAULT_SERVICE);
